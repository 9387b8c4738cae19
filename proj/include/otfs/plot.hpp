#pragma once

#include <string>
#include <vector>

#include "otfs/sweep.hpp"

namespace otfs {

/// Log-y FER vs SNR line chart, one series per scheme, written as SVG.
std::string fer_chart_svg(const std::vector<SweepRow>& rows);
void write_fer_chart(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace otfs
