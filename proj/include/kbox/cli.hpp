#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kbox::cli {

// Runs one command; `args` excludes the program name. Results are printed to
// `out` as JSON, diagnostics to `err`. Returns the process exit code:
//   0  positive verdict
//   1  negative verdict (certificate in the JSON body)
//   2  usage, parse, model-format, or precondition error
//   3  resource limit exceeded
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kbox::cli
