#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uprov {

// args[0] is the program name. Returns 0 on success, 1 on a domain error
// (bad input files, failed audit, evaluation errors) and 2 on a usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uprov
