#pragma once

#include <string>

namespace bregret::cli {

// Writes `content` to `path` via a sibling temp file and a rename, so a reader
// never sees a partial file. An empty path writes to stdout.
void write_output(const std::string& path, const std::string& content);

}  // namespace bregret::cli
