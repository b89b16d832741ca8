#include "vishell/harness.hpp"

int main(int argc, char** argv) {
    return vishell::cli_main(argc, argv);
}
