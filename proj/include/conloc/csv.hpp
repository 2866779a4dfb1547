#pragma once

#include <istream>
#include <string>
#include <vector>

namespace conloc::csv {

// RFC 4180 row reader. Quoted fields may contain commas, doubled quotes and
// newlines; records end at LF, CRLF or end of input. Blank lines are skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(&in) {}

  // Reads the next record into `row`. Returns false at end of input.
  bool next(std::vector<std::string>& row);

  // 1-based physical line number of the first line of the last record read.
  long line() const { return row_line_; }

 private:
  std::istream* in_;
  long newlines_seen_ = 0;
  long row_line_ = 0;
};

// Quotes a field if it contains a comma, quote or newline.
std::string escape(const std::string& field);

// Joins fields into one CSV record, no trailing newline.
std::string join(const std::vector<std::string>& row);

}  // namespace conloc::csv
