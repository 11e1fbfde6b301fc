#include "textdiar/jsonl.h"

#include <fstream>
#include <sstream>

#include "textdiar/errors.h"
#include "textdiar/text.h"

namespace textdiar {

void for_each_record(std::istream& in, const std::string& source,
                     const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw_parse(source + ":" + std::to_string(line_no) +
                  ": malformed record: " + e.what());
    }
    if (!record.is_object()) {
      throw_parse(source + ":" + std::to_string(line_no) +
                  ": record is not an object");
    }
    fn(record, line_no);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open for reading: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open for writing: " + path);
  return out;
}

void write_record(std::ostream& out, const Json& record) {
  out << record.dump() << '\n';
}

std::string read_file(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace textdiar
