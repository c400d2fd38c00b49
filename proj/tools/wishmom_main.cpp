#include "wishmom/cli.hpp"

int main(int argc, char** argv) { return wishmom::cli::run_main(argc, argv); }
