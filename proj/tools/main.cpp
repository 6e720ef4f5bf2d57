#include "cli_app.hpp"

int main(int argc, char** argv) { return semideg::cli::run(argc, argv); }
