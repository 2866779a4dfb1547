#include "conloc/types.hpp"

#include <algorithm>
#include <cctype>

namespace conloc {

std::string_view technology_name(Technology t) {
  switch (t) {
    case Technology::DSL:
      return "DSL";
    case Technology::CABLE:
      return "CABLE";
    case Technology::OTHER:
      return "OTHER";
  }
  return "OTHER";
}

namespace {

std::string lower_trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<Technology> parse_technology(std::string_view s) {
  std::string v = lower_trim(s);
  if (v.empty()) return std::nullopt;
  if (v == "dsl") return Technology::DSL;
  if (v == "cable") return Technology::CABLE;
  return Technology::OTHER;
}

std::optional<int> site_index(std::string_view raw) {
  std::string v = lower_trim(raw);
  auto strip_prefix = [&](std::string_view p) {
    if (v.rfind(p, 0) == 0) v.erase(0, p.size());
  };
  strip_prefix("https://");
  strip_prefix("http://");
  strip_prefix("www.");
  if (auto slash = v.find('/'); slash != std::string::npos) v.erase(slash);
  auto strip_suffix = [&](std::string_view sfx) {
    if (v.size() > sfx.size() && v.compare(v.size() - sfx.size(), sfx.size(), sfx) == 0)
      v.erase(v.size() - sfx.size());
  };
  strip_suffix(".com");
  strip_suffix(".org");
  for (int i = 0; i < kSiteCount; ++i) {
    if (v == kSites[i]) return i;
  }
  return std::nullopt;
}

}  // namespace conloc
