// Regenerates the deterministic fixture files used by the test suite.
// Usage: wft_fixtures [output-dir]   (default: fixtures)

#include "wft/fixtures.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "fixtures";
    try {
        const auto files = wft::write_fixture_files(dir);
        for (const auto& f : files) std::cout << f << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
