#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "fracdecay/errors.hpp"
#include "fracdecay/run.hpp"

int main(int argc, char** argv) {
    fracdecay::RunConfig cfg;
    try {
        cfg = fracdecay::parse_config(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const fracdecay::HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const fracdecay::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        return fracdecay::run(cfg);
    } catch (const fracdecay::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 1;
    }
}
