#include "mfc/csv.hpp"

#include <array>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "mfc/errors.hpp"

namespace mfc {

namespace {

constexpr std::array<const char*, 7> kLoopOrder = {"y_ref", "y_true", "y_meas", "u",
                                                   "e",     "f_est",  "ref_moving"};

template <class Trace>
auto& field(Trace& L, std::string_view name) {
  if (name == "y_ref") return L.y_ref;
  if (name == "y_true") return L.y_true;
  if (name == "y_meas") return L.y_meas;
  if (name == "u") return L.u;
  if (name == "e") return L.e;
  if (name == "f_est") return L.f_est;
  return L.ref_moving;
}

std::string suffix(const TimeSeries& ts, std::size_t i) {
  return ts.loops.size() > 1 ? "_" + std::to_string(i + 1) : "";
}

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::string> csv_columns(const TimeSeries& ts) {
  std::vector<std::string> cols{"t"};
  for (std::size_t i = 0; i < ts.loops.size(); ++i) {
    for (const char* f : kLoopOrder) cols.push_back(f + suffix(ts, i));
  }
  cols.insert(cols.end(), ts.extra_names.begin(), ts.extra_names.end());
  return cols;
}

void write_csv(const TimeSeries& ts, std::ostream& out) {
  const auto cols = csv_columns(ts);
  std::string line;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) line += ',';
    line += cols[c];
  }
  line += '\n';
  out << line;
  for (std::size_t k = 0; k < ts.rows(); ++k) {
    line.clear();
    put(line, ts.t[k]);
    for (const LoopTrace& L : ts.loops) {
      for (const char* f : kLoopOrder) {
        line += ',';
        put(line, field(L, f)[k]);
      }
    }
    for (const auto& col : ts.extras) {
      line += ',';
      put(line, col[k]);
    }
    line += '\n';
    out << line;
  }
}

std::string csv_string(const TimeSeries& ts) {
  std::ostringstream out;
  write_csv(ts, out);
  return out.str();
}

void emit_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  write_csv(ts, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

TimeSeries parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV is empty");
  const auto header = split(line);
  if (header.empty() || header[0] != "t") throw IoError("CSV must start with a 't' column");

  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) index[header[c]] = c;

  TimeSeries ts;
  std::vector<std::string> suffixes;
  if (index.count("e")) {
    suffixes.push_back("");
  } else {
    for (std::size_t i = 1; index.count("e_" + std::to_string(i)); ++i) suffixes.push_back("_" + std::to_string(i));
  }
  if (suffixes.empty()) throw IoError("CSV has no error column");
  ts.loops.resize(suffixes.size());

  std::vector<bool> used(header.size(), false);
  used[0] = true;
  std::vector<std::pair<std::size_t, std::vector<double>*>> targets;
  for (std::size_t i = 0; i < suffixes.size(); ++i) {
    for (const char* f : kLoopOrder) {
      const auto it = index.find(f + suffixes[i]);
      if (it == index.end()) throw IoError(std::string("CSV is missing column ") + f + suffixes[i]);
      used[it->second] = true;
      targets.emplace_back(it->second, &field(ts.loops[i], f));
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!used[c]) ts.extra_names.push_back(header[c]);
  }
  ts.extras.resize(ts.extra_names.size());

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw IoError("CSV row " + std::to_string(row) + " has the wrong width");
    std::vector<double> v(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      v[c] = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0') {
        throw IoError("CSV row " + std::to_string(row) + " has a non-numeric cell");
      }
    }
    ts.t.push_back(v[0]);
    for (auto& [c, dst] : targets) dst->push_back(v[c]);
    std::size_t x = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!used[c]) ts.extras[x++].push_back(v[c]);
    }
  }
  return ts;
}

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace mfc
