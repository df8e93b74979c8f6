#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iuws {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failed = 1;
inline constexpr int validation = 2;
inline constexpr int solver = 3;
}  // namespace exit_code

/// Entry point of the iuws tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace iuws
