#pragma once

#include <optional>
#include <string_view>

namespace slrkit::data {

/// Contents of a file from the repository's data/ directory, compiled into the library.
std::optional<std::string_view> embedded_file(std::string_view name);

}  // namespace slrkit::data
