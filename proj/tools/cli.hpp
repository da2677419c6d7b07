#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ticksynth::cli
{

// Exit codes: 0 found / satisfied, 1 not found / not satisfied, 2 usage or
// input error.
inline constexpr int exit_found = 0;
inline constexpr int exit_not_found = 1;
inline constexpr int exit_error = 2;

int run( int argc, const char* const* argv, std::ostream& out, std::ostream& err );
int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err );

} // namespace ticksynth::cli
