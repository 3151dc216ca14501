#include "lacki/cli.hpp"

int main(int argc, char** argv) { return lacki::cli::run(argc, argv); }
