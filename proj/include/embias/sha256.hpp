#pragma once

#include <string>
#include <string_view>

namespace embias {

// SHA-256 digest of `data`, returned as 64 lowercase hex characters.
std::string sha256_hex(std::string_view data);

}  // namespace embias
