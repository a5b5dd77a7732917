#include "ydde/cli.hpp"

int main(int argc, char** argv) { return ydde::cli::run(argc, argv); }
