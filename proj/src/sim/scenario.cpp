#include "conloc/sim/scenario.hpp"

#include <charconv>
#include <istream>
#include <map>

#include "conloc/numfmt.hpp"
#include "conloc/timeutil.hpp"

namespace conloc::sim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

struct Ctx {
  std::string_view filename;
  long line = 0;
  std::string_view key;

  [[noreturn]] void fail(std::string_view what) const {
    throw ScenarioError(std::string(filename) + ":" + std::to_string(line) + ": " +
                        std::string(what) + " \"" + std::string(key) + "\"");
  }

  double real(std::string_view value) const {
    auto v = numfmt::parse_double(value);
    if (!v) fail("invalid value for");
    return *v;
  }

  int64_t integer(std::string_view value) const {
    auto v = numfmt::parse_int64(value);
    if (!v) fail("invalid value for");
    return *v;
  }

  uint64_t unsigned_integer(std::string_view value) const {
    auto s = trim(value);
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("invalid value for");
    return v;
  }
};

bool set_link_param(LinkParams& lp, std::string_view sub, std::string_view value,
                    const Ctx& ctx) {
  if (sub == "capacity_bps") {
    lp.capacity_bps = ctx.real(value);
    if (lp.capacity_bps <= 0) ctx.fail("capacity must be positive:");
  } else if (sub == "diurnal_amplitude") {
    lp.diurnal_amplitude = ctx.real(value);
    if (lp.diurnal_amplitude < 0 || lp.diurnal_amplitude >= 1)
      ctx.fail("amplitude must be in [0, 1):");
  } else if (sub == "noise_sigma") {
    lp.noise_sigma = ctx.real(value);
    if (lp.noise_sigma < 0) ctx.fail("sigma must be non-negative:");
  } else if (sub == "flows_base") {
    lp.flows_base = static_cast<int>(ctx.integer(value));
    if (lp.flows_base < 1) ctx.fail("flow count must be at least 1:");
  } else if (sub == "flows_peak_extra") {
    lp.flows_peak_extra = static_cast<int>(ctx.integer(value));
    if (lp.flows_peak_extra < 0) ctx.fail("extra flows must be non-negative:");
  } else if (sub == "plant.p") {
    lp.plant_p = ctx.real(value);
    if (lp.plant_p < 0 || lp.plant_p > 1) ctx.fail("probability must be in [0, 1]:");
  } else if (sub == "plant.depth") {
    lp.plant_depth = ctx.real(value);
    if (lp.plant_depth <= 0 || lp.plant_depth > 1) ctx.fail("depth must be in (0, 1]:");
  } else if (sub == "plant.slot_s") {
    lp.plant_slot_s = ctx.integer(value);
    if (lp.plant_slot_s < 1) ctx.fail("slot must be at least 1 s:");
  } else {
    return false;
  }
  return true;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

void set_group_key(Scenario& sc, std::map<std::string, size_t>& index, std::string_view rest,
                   std::string_view value, const Ctx& ctx) {
  size_t dot = rest.find('.');
  if (dot == std::string_view::npos || dot == 0) ctx.fail("unknown key");
  std::string name(rest.substr(0, dot));
  std::string_view sub = rest.substr(dot + 1);
  if (!valid_name(name)) ctx.fail("invalid group name in");

  auto [it, inserted] = index.try_emplace(name, sc.groups.size());
  if (inserted) {
    sc.groups.emplace_back();
    sc.groups.back().name = name;
  }
  GroupSpec& g = sc.groups[it->second];

  if (sub == "connections") {
    g.connections = static_cast<int>(ctx.integer(value));
    if (g.connections < 1) ctx.fail("connection count must be at least 1:");
  } else if (sub == "technology") {
    auto t = parse_technology(value);
    if (!t) ctx.fail("invalid value for");
    g.technology = *t;
  } else if (sub == "isps") {
    g.isps.clear();
    std::string_view v = value;
    while (!v.empty()) {
      size_t comma = v.find(',');
      std::string_view item = trim(v.substr(0, comma));
      if (item.empty()) ctx.fail("empty ISP name in");
      g.isps.emplace_back(item);
      if (comma == std::string_view::npos) break;
      v.remove_prefix(comma + 1);
    }
    if (g.isps.empty()) ctx.fail("empty value for");
  } else if (sub == "tier_bps") {
    g.tier_bps = ctx.real(value);
    if (g.tier_bps <= 0) ctx.fail("tier must be positive:");
  } else if (sub == "middle.count") {
    g.middle_count = static_cast<int>(ctx.integer(value));
    if (g.middle_count < 1) ctx.fail("link count must be at least 1:");
  } else if (sub.substr(0, 8) == "initial.") {
    if (!set_link_param(g.initial, sub.substr(8), value, ctx)) ctx.fail("unknown key");
  } else if (sub.substr(0, 7) == "middle.") {
    if (!set_link_param(g.middle, sub.substr(7), value, ctx)) ctx.fail("unknown key");
  } else {
    ctx.fail("unknown key");
  }
}

void set_key(Scenario& sc, std::map<std::string, size_t>& index, std::string_view key,
             std::string_view value, const Ctx& ctx) {
  if (key == "seed") {
    sc.seed = ctx.unsigned_integer(value);
  } else if (key == "start_month") {
    auto ym = timeutil::parse_year_month(value);
    if (!ym) ctx.fail("invalid value for");
    sc.start_month = *ym;
  } else if (key == "n_months") {
    sc.n_months = static_cast<int>(ctx.integer(value));
    if (sc.n_months < 1) ctx.fail("month count must be at least 1:");
  } else if (key == "cadence_s") {
    sc.cadence_s = ctx.integer(value);
    if (sc.cadence_s < 1) ctx.fail("cadence must be at least 1 s:");
  } else if (key == "page_bytes") {
    sc.page_bytes = ctx.integer(value);
    if (sc.page_bytes < 1) ctx.fail("page size must be at least 1 byte:");
  } else if (key == "site_lag_s") {
    sc.site_lag_s = ctx.integer(value);
    if (sc.site_lag_s < 0) ctx.fail("lag must be non-negative:");
  } else if (key == "utc_offset_s") {
    int64_t v = ctx.integer(value);
    if (v < -86400 || v > 86400) ctx.fail("offset must be within a day:");
    sc.utc_offset_s = static_cast<int32_t>(v);
  } else if (key == "tis_tau") {
    sc.tis_tau = ctx.real(value);
    if (sc.tis_tau < 0 || sc.tis_tau > 1) ctx.fail("threshold must be in [0, 1]:");
  } else if (key == "rc_q") {
    sc.rc_q = ctx.real(value);
    if (sc.rc_q < 0 || sc.rc_q > 1) ctx.fail("threshold must be in [0, 1]:");
  } else if (key == "rc_t") {
    sc.rc_t = ctx.real(value);
    if (sc.rc_t < 0 || sc.rc_t > 1) ctx.fail("threshold must be in [0, 1]:");
  } else if (key == "drop_prob") {
    sc.drop_prob = ctx.real(value);
    if (sc.drop_prob < 0 || sc.drop_prob >= 1) ctx.fail("probability must be in [0, 1):");
  } else if (key == "burst_factor") {
    sc.burst_factor = ctx.real(value);
    if (sc.burst_factor <= 0) ctx.fail("factor must be positive:");
  } else if (key.substr(0, 5) == "core.") {
    if (!set_link_param(sc.core, key.substr(5), value, ctx)) ctx.fail("unknown key");
  } else if (key.substr(0, 5) == "edge.") {
    if (!set_link_param(sc.edge, key.substr(5), value, ctx)) ctx.fail("unknown key");
  } else if (key.substr(0, 6) == "group.") {
    set_group_key(sc, index, key.substr(6), value, ctx);
  } else {
    ctx.fail("unknown key");
  }
}

}  // namespace

Scenario parse_scenario(std::istream& in, std::string_view filename) {
  Scenario sc;
  std::map<std::string, size_t> index;
  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view s = raw;
    if (size_t hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    size_t eq = s.find('=');
    Ctx ctx{filename, line_no, s};
    if (eq == std::string_view::npos) ctx.fail("expected key = value, got");
    std::string_view key = trim(s.substr(0, eq));
    std::string_view value = trim(s.substr(eq + 1));
    ctx.key = key;
    if (key.empty()) ctx.fail("missing key in");
    if (value.empty()) ctx.fail("empty value for");
    set_key(sc, index, key, value, ctx);
  }
  if (in.bad()) throw ScenarioError(std::string(filename) + ": read error");

  if (sc.groups.empty())
    throw ScenarioError(std::string(filename) + ": no connection groups defined");
  for (auto& g : sc.groups) {
    Ctx ctx{filename, line_no, ""};
    std::string key;
    if (g.connections < 1) {
      key = "group." + g.name + ".connections";
      ctx.key = key;
      ctx.fail("missing required key");
    }
    if (g.tier_bps <= 0) {
      key = "group." + g.name + ".tier_bps";
      ctx.key = key;
      ctx.fail("missing required key");
    }
    if (g.isps.empty()) g.isps.push_back("isp_" + g.name);
  }
  return sc;
}

}  // namespace conloc::sim
