#include "prm/cli.hpp"

int main(int argc, char** argv) { return prm::run_cli(argc, argv); }
