#include "qdd/cli.hpp"

int main(int argc, char** argv) {
    return qdd::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
