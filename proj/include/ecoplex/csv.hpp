#pragma once

#include <string>
#include <vector>

namespace ecoplex::csv {

// Splits one CSV line on `delim`. No quoting: cells must not contain the
// delimiter (country/product codes and numbers never do).
std::vector<std::string> split(const std::string& line, char delim);

// Strips surrounding ASCII whitespace and a UTF-8 BOM if present.
std::string trim(const std::string& s);

// Decimal with 12 significant digits; the one formatter used for every
// numeric cell we emit, so reruns are byte-identical.
std::string format_number(double v);

}  // namespace ecoplex::csv
