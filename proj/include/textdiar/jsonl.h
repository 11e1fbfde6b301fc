#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "json.hpp"

namespace textdiar {

using Json = nlohmann::json;

// Calls fn(record, line_number) for each non-blank line. Malformed JSON
// raises a parse error naming the line.
void for_each_record(std::istream& in, const std::string& source,
                     const std::function<void(const Json&, std::size_t)>& fn);

std::ifstream open_input(const std::string& path);
std::ofstream open_output(const std::string& path);

void write_record(std::ostream& out, const Json& record);

// Reads the whole file into a string; throws an I/O error naming the path.
std::string read_file(const std::string& path);

}  // namespace textdiar
