#pragma once

#include <string>
#include <utility>

#include "otfs/link.hpp"

namespace otfs {

/// Binary (H, P) pair dump consumed by the eval-theory CLI subcommand.
void save_pair(const std::string& path, const DdChannel& h, const Precoder& p);
std::pair<DdChannel, Precoder> load_pair(const std::string& path);

}  // namespace otfs
