#include "conloc/csv.hpp"

namespace conloc::csv {

bool Reader::next(std::vector<std::string>& row) {
  row.clear();
  int c = in_->get();
  while (c == '\n' || c == '\r') {
    if (c == '\n') ++newlines_seen_;
    c = in_->get();
  }
  if (c == std::istream::traits_type::eof()) return false;
  row_line_ = newlines_seen_ + 1;

  std::string field;
  bool in_quotes = false;
  while (true) {
    if (c == std::istream::traits_type::eof()) {
      row.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        int p = in_->peek();
        if (p == '"') {
          field.push_back('"');
          in_->get();
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++newlines_seen_;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      in_quotes = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && in_->peek() == '\n') in_->get();
      ++newlines_seen_;
      row.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
    c = in_->get();
  }
}

std::string escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& row) {
  std::string out;
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(row[i]);
  }
  return out;
}

}  // namespace conloc::csv
