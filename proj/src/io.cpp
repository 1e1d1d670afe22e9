#include "boostr/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace boostr {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(path, line, "expected a number, got '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& path, int line) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(path, line, "expected an integer, got '" + s + "'");
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& events_path, const std::string& static_path,
                     const std::optional<std::string>& dynamic_path, int grid_m) {
  Dataset data;

  // Static features define the individual order and p.
  {
    auto in = open_input(static_path);
    std::string line;
    if (!std::getline(in, line)) fail(static_path, 1, "missing header");
    auto header = split_csv(line);
    if (header.empty() || header[0] != "id") fail(static_path, 1, "header must start with 'id'");
    data.p = static_cast<int>(header.size()) - 1;
    int lineno = 1;
    std::map<std::string, int> index_of;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto cells = split_csv(line);
      if (static_cast<int>(cells.size()) != data.p + 1) fail(static_path, lineno, "expected " + std::to_string(data.p + 1) + " columns");
      Individual ind;
      ind.id = cells[0];
      if (index_of.count(ind.id)) fail(static_path, lineno, "duplicate id '" + ind.id + "'");
      ind.x.resize(data.p);
      for (int j = 0; j < data.p; ++j) ind.x[j] = parse_double(cells[j + 1], static_path, lineno);
      index_of[ind.id] = data.size();
      data.individuals.push_back(std::move(ind));
    }
    if (data.individuals.empty()) throw std::runtime_error(static_path + ": no individuals");
  }

  std::map<std::string, int> index_of;
  for (int i = 0; i < data.size(); ++i) index_of[data.individuals[i].id] = i;

  // Events. Times must already be ascending within each id; every id gets
  // exactly one censor row.
  {
    auto in = open_input(events_path);
    std::string line;
    if (!std::getline(in, line)) fail(events_path, 1, "missing header");
    if (split_csv(line) != std::vector<std::string>{"id", "time", "kind"}) fail(events_path, 1, "header must be 'id,time,kind'");
    int lineno = 1;
    std::vector<char> has_censor(data.size(), 0);
    std::vector<std::vector<int>> event_lines(data.size());
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto cells = split_csv(line);
      if (cells.size() != 3) fail(events_path, lineno, "expected 3 columns");
      auto it = index_of.find(cells[0]);
      if (it == index_of.end()) fail(events_path, lineno, "unknown id '" + cells[0] + "'");
      Individual& ind = data.individuals[it->second];
      const double t = parse_double(cells[1], events_path, lineno);
      if (cells[2] == "event") {
        if (!(t > 0.0)) fail(events_path, lineno, "event time must be > 0");
        if (!ind.events.times.empty() && t <= ind.events.times.back())
          fail(events_path, lineno, "unsorted or duplicate event time for id '" + cells[0] + "'");
        ind.events.times.push_back(t);
        event_lines[it->second].push_back(lineno);
      } else if (cells[2] == "censor") {
        if (has_censor[it->second]) fail(events_path, lineno, "duplicate censor row for id '" + cells[0] + "'");
        if (!(t > 0.0)) fail(events_path, lineno, "censor time must be > 0");
        ind.events.censor = t;
        has_censor[it->second] = 1;
      } else {
        fail(events_path, lineno, "kind must be 'event' or 'censor'");
      }
    }
    for (int i = 0; i < data.size(); ++i) {
      if (!has_censor[i]) throw std::runtime_error(events_path + ": no censor row for id '" + data.individuals[i].id + "'");
      const auto& ev = data.individuals[i].events;
      for (size_t k = 0; k < ev.times.size(); ++k)
        if (ev.times[k] > ev.censor)
          fail(events_path, event_lines[i][k], "event time after censoring time for id '" + data.individuals[i].id + "'");
    }
  }

  // Dynamic series, optional.
  if (dynamic_path) {
    auto in = open_input(*dynamic_path);
    std::string line;
    if (!std::getline(in, line)) fail(*dynamic_path, 1, "missing header");
    if (split_csv(line) != std::vector<std::string>{"id", "feature", "time", "value"})
      fail(*dynamic_path, 1, "header must be 'id,feature,time,value'");
    int lineno = 1;
    int q = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto cells = split_csv(line);
      if (cells.size() != 4) fail(*dynamic_path, lineno, "expected 4 columns");
      auto it = index_of.find(cells[0]);
      if (it == index_of.end()) fail(*dynamic_path, lineno, "unknown id '" + cells[0] + "'");
      const long feat = parse_long(cells[1], *dynamic_path, lineno);
      if (feat < 1) fail(*dynamic_path, lineno, "feature index must be >= 1");
      q = std::max(q, static_cast<int>(feat));
      Individual& ind = data.individuals[it->second];
      if (static_cast<long>(ind.z.size()) < feat) ind.z.resize(feat);
      DynamicSeries& s = ind.z[feat - 1];
      const double t = parse_double(cells[2], *dynamic_path, lineno);
      const double v = parse_double(cells[3], *dynamic_path, lineno);
      if (s.times.empty() && t != 0.0) fail(*dynamic_path, lineno, "series must start at time 0");
      if (!s.times.empty() && t <= s.times.back()) fail(*dynamic_path, lineno, "unsorted series time");
      s.times.push_back(t);
      s.values.push_back(v);
    }
    data.q = q;
    for (const auto& ind : data.individuals) {
      if (static_cast<int>(ind.z.size()) != q)
        throw std::runtime_error(*dynamic_path + ": id '" + ind.id + "' is missing dynamic features");
      for (int l = 0; l < q; ++l)
        if (ind.z[l].times.empty())
          throw std::runtime_error(*dynamic_path + ": id '" + ind.id + "' is missing feature " + std::to_string(l + 1));
    }
  }

  double t_max = 0.0;
  for (const auto& ind : data.individuals) t_max = std::max(t_max, ind.events.censor);
  data.grid = build_grid(t_max, grid_m);
  data.validate();
  return data;
}

void save_dataset(const Dataset& data, const std::string& events_path, const std::string& static_path,
                  const std::optional<std::string>& dynamic_path) {
  {
    auto out = open_output(static_path);
    out << "id";
    for (int j = 1; j <= data.p; ++j) out << ",x" << j;
    out << "\n";
    for (const auto& ind : data.individuals) {
      out << ind.id;
      for (int j = 0; j < data.p; ++j) out << "," << format_double(ind.x[j]);
      out << "\n";
    }
  }
  {
    auto out = open_output(events_path);
    out << "id,time,kind\n";
    for (const auto& ind : data.individuals) {
      for (double t : ind.events.times) out << ind.id << "," << format_double(t) << ",event\n";
      out << ind.id << "," << format_double(ind.events.censor) << ",censor\n";
    }
  }
  if (dynamic_path) {
    auto out = open_output(*dynamic_path);
    out << "id,feature,time,value\n";
    for (const auto& ind : data.individuals) {
      for (int l = 0; l < static_cast<int>(ind.z.size()); ++l) {
        const auto& s = ind.z[l];
        for (size_t k = 0; k < s.times.size(); ++k)
          out << ind.id << "," << (l + 1) << "," << format_double(s.times[k]) << "," << format_double(s.values[k]) << "\n";
      }
    }
  }
}

void save_curves(const std::vector<std::pair<std::string, Curve>>& curves, const std::string& path) {
  auto out = open_output(path);
  out << "id,t,value,masked\n";
  for (const auto& [id, c] : curves) {
    for (int j = 0; j < c.grid.m; ++j)
      out << id << "," << format_double(c.grid.t(j)) << "," << format_double(c.values[j]) << "," << (c.observed(j) ? 1 : 0)
          << "\n";
  }
}

}  // namespace boostr
