#include "aqtlab/io.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aqtlab {

using nlohmann::json;

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::int64_t parse_int(const std::string& text, std::size_t line) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParseError("expected an integer, got '" + text + "'", line);
  return v;
}

Rational parse_rational_at(const std::string& text, std::size_t line) {
  try {
    return parse_rational(text);
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line);
  }
}

Rational rational_field(const json& j, const char* key, std::optional<Rational> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError(std::string("missing field '") + key + "'");
  }
  const auto& v = j.at(key);
  if (v.is_string()) return parse_rational_at(v.get<std::string>(), 0);
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw ParseError(std::string("field '") + key + "' must be an integer or a \"p/q\" string");
}

}  // namespace

void write_pattern_csv(std::ostream& out, const InjectionPattern& pattern) {
  out << "# buffers=" << pattern.buffers() << " horizon=" << pattern.horizon() << "\n";
  out << "round,origin,count,size\n";
  const auto items = pattern.items();
  for (std::size_t k = 0; k < items.size();) {
    std::size_t j = k + 1;
    while (j < items.size() && items[j] == items[k]) ++j;
    out << items[k].round << "," << items[k].route.origin << "," << (j - k) << "," << to_string(items[k].size)
        << "\n";
    k = j;
  }
}

InjectionPattern read_pattern_csv(std::istream& in) {
  std::optional<int> buffers;
  std::optional<std::int64_t> horizon;
  std::vector<PacketSpec> items;
  std::string raw;
  std::size_t line = 0;
  bool header_seen = false;
  int max_origin = 0;
  std::int64_t max_round = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    if (text[0] == '#') {
      std::istringstream meta(text.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "buffers") buffers = static_cast<int>(parse_int(value, line));
        if (key == "horizon") horizon = parse_int(value, line);
      }
      continue;
    }
    if (!header_seen && text.rfind("round", 0) == 0) {
      header_seen = true;
      if (split(text, ',') != std::vector<std::string>{"round", "origin", "count", "size"}) {
        throw ParseError("expected header round,origin,count,size", line);
      }
      continue;
    }
    const auto fields = split(text, ',');
    if (fields.size() != 4) throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line);
    const auto round = parse_int(fields[0], line);
    const auto origin = parse_int(fields[1], line);
    const auto count = parse_int(fields[2], line);
    const auto size = parse_rational_at(fields[3], line);
    if (count < 0) throw ParseError("negative count", line);
    if (origin < 1 || origin > std::numeric_limits<int>::max()) throw ParseError("origin must be >= 1", line);
    max_origin = std::max(max_origin, static_cast<int>(origin));
    max_round = std::max(max_round, round);
    for (std::int64_t c = 0; c < count; ++c) items.push_back(PacketSpec{round, Route{static_cast<int>(origin)}, size});
  }
  try {
    return InjectionPattern(buffers.value_or(std::max(max_origin, 1)), horizon.value_or(max_round), std::move(items));
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
}

void write_flows_json(std::ostream& out, const FlowFamily& family) {
  json j;
  j["buffers"] = family.buffers;
  j["rate"] = to_string(family.rate);
  j["sigma"] = to_string(family.sigma);
  j["flows"] = json::array();
  for (const auto& f : family.flows) {
    json flow;
    flow["origin"] = f.route.origin;
    flow["rate"] = to_string(f.rate);
    flow["burst"] = to_string(f.burst);
    flow["tail_slope"] = to_string(f.curve.tail_slope());
    flow["breakpoints"] = json::array();
    for (const auto& p : f.curve.breakpoints()) {
      flow["breakpoints"].push_back(
          json{{"t", to_string(p.time)}, {"left", to_string(p.left)}, {"value", to_string(p.value)}});
    }
    j["flows"].push_back(std::move(flow));
  }
  out << j.dump(2) << "\n";
}

FlowFamily read_flows_json(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    FlowFamily family;
    family.buffers = j.at("buffers").get<int>();
    family.rate = rational_field(j, "rate");
    family.sigma = rational_field(j, "sigma", Rational{0});
    for (const auto& jf : j.at("flows")) {
      std::vector<Breakpoint> points;
      for (const auto& jp : jf.value("breakpoints", json::array())) {
        const auto value = rational_field(jp, "value");
        points.push_back(Breakpoint{rational_field(jp, "t"), rational_field(jp, "left", value), value});
      }
      family.flows.push_back(Flow{ArrivalCurve(std::move(points), rational_field(jf, "tail_slope", Rational{0})),
                                  Route{jf.at("origin").get<int>()}, rational_field(jf, "rate", Rational{0}),
                                  rational_field(jf, "burst", Rational{0})});
    }
    return family;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad flow family: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("bad flow family: ") + e.what());
  }
}

std::string params_to_json(const BoundParams& params) {
  json j;
  j["rho"] = to_string(params.rho);
  j["sigma"] = to_string(params.sigma);
  j["beta"] = json::array();
  for (const auto& b : params.beta) j["beta"].push_back(to_string(b));
  return j.dump(2);
}

BoundParams params_from_json(const std::string& text, int buffers) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  BoundParams p = BoundParams::uniform(buffers, rational_field(j, "rho"), rational_field(j, "sigma", Rational{0}),
                                       Rational{0});
  if (j.contains("beta")) {
    const auto& b = j.at("beta");
    if (b.is_array()) {
      if (static_cast<int>(b.size()) != buffers) {
        throw ParseError("beta lists " + std::to_string(b.size()) + " entries for " + std::to_string(buffers) +
                         " buffers");
      }
      for (int f = 1; f <= buffers; ++f) {
        json wrap{{"v", b.at(static_cast<std::size_t>(f - 1))}};
        p.beta[f] = rational_field(wrap, "v");
      }
    } else {
      const auto v = rational_field(j, "beta");
      for (int f = 1; f <= buffers; ++f) p.beta[f] = v;
    }
  }
  try {
    p.validate(buffers);
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return p;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "round,buffer,load\n";
  for (std::int64_t r = trace.first_round(); r < trace.first_round() + trace.rounds(); ++r) {
    for (int i = 1; i <= trace.buffers(); ++i) out << r << "," << i << "," << trace.load(r, i) << "\n";
  }
}

void write_summary_csv(std::ostream& out, const Trace& trace) {
  out << "buffer,max_load,argmax_round\n";
  for (int i = 1; i <= trace.buffers(); ++i) {
    const auto& p = trace.peaks()[i];
    out << i << "," << p.max_load << "," << p.argmax_round << "\n";
  }
}

void write_events_jsonl(std::ostream& out, const Trace& trace) {
  for (const auto& e : trace.events()) {
    json j{{"round", e.round}, {"packet", e.packet}, {"event", std::string(to_string(e.kind))},
           {"buffer", e.buffer}, {"height", e.height}};
    out << j.dump() << "\n";
  }
}

}  // namespace aqtlab
