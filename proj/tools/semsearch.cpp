#include "semsearch/cli/app.hpp"

int main(int argc, char** argv) { return semsearch::cli::run(argc, argv); }
