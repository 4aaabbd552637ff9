#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmfill {

/// Entry point behind the `mmfill` binary. args excludes the program name.
/// Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mmfill
