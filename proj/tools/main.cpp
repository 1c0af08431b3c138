#include "btq_cli.hpp"

int main(int argc, char** argv) { return btq::cli::main_entry(argc, argv); }
