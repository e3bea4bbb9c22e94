#include <string>
#include <vector>

#include "lesionq/cli.hpp"

int main(int argc, char** argv) { return lesionq::cli::run(std::vector<std::string>(argv, argv + argc)); }
