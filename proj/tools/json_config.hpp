#pragma once

#include <string>
#include <vector>

namespace gap::cli {

// Turns a JSON config into flag tokens for `subcommand`. Top-level scalar keys
// apply to every subcommand; an object under the subcommand's own name applies
// only to it. true -> "--key", false -> omitted, arrays repeat the flag.
// Throws UsageError for unreadable files or unsupported values.
std::vector<std::string> config_to_args(const std::string& path, const std::string& subcommand);
std::vector<std::string> config_text_to_args(const std::string& text, const std::string& subcommand);

}  // namespace gap::cli
