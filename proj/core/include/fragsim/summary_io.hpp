#pragma once

#include <ostream>
#include <string>

#include "fragsim/stats.hpp"

namespace fragsim {

// Structured tree format (JSON), stable key order, round-trip float
// precision. Byte-identical for identical inputs.
std::string summary_to_json(const SummaryStats& s);

// Flat text format: one `key,value` line per scalar, and
// `pmf.<name>,<value>,<weight>` lines for the histograms.
void write_summary_flat(std::ostream& os, const SummaryStats& s);

} // namespace fragsim
