#include "usp/cli.hpp"

int main(int argc, char** argv) {
    return usp::run_cli(argc, argv);
}
