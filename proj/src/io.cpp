#include "byucop/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace byucop {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed",
      "data.path",
      "output.dir",
      "degree.k",
      "run.iterations",
      "run.burnin",
      "run.thin",
      "run.g_subsweeps",
      "run.r_hr",
      "run.chains",
      "proposal.kind",
      "proposal.u",
      "proposal.tau",
      "prior.distance",
      "prior.alpha",
      "prior.gamma",
      "prior.centering",
      "prior.r",
      "marginals.kind",
      "marginals.families",
      "marginals.init",
      "marginals.sample",
      "projection.qmc_points",
      "projection.sinkhorn_iterations",
      "fit.baseline",
      "diagnose.reference",
      "diagnose.grid",
  };
  return keys;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& is) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
    }
    cfg.set(key, value);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  return parse(is);
}

bool Config::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == key; });
}

const std::string& Config::get(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  throw std::runtime_error("config: missing required key '" + key + "'");
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  std::size_t pos = 0;
  double out = std::stod(v, &pos);
  if (pos != v.size()) throw std::runtime_error("config: key '" + key + "' is not a number");
  return out;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string& v = get(key);
  std::size_t pos = 0;
  long long out = std::stoll(v, &pos);
  if (pos != v.size()) throw std::runtime_error("config: key '" + key + "' is not an integer");
  return out;
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::runtime_error("config: key '" + key + "' is an empty list");
  return out;
}

std::vector<std::string> Config::get_words(const std::string& key) const {
  std::string value = get(key);
  for (char& ch : value) {
    if (ch == ',') ch = ' ';
  }
  std::vector<std::string> out;
  std::istringstream ss(value);
  std::string item;
  while (ss >> item) out.push_back(item);
  if (out.empty()) throw std::runtime_error("config: key '" + key + "' is an empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw std::runtime_error("config: unknown key '" + key + "'");
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Config::echo(std::ostream& os) const {
  for (const auto& [key, value] : entries_) os << key << " = " << value << "\n";
}

Dataset read_csv(std::istream& is) {
  Dataset ds;
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  std::size_t ncols = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");

    std::vector<double> vals;
    bool numeric = true;
    for (const auto& f : fields) {
      try {
        std::size_t pos = 0;
        std::string t = f;
        t.erase(std::remove_if(t.begin(), t.end(),
                               [](char c) { return c == ' ' || c == '\t'; }),
                t.end());
        if (t.empty()) throw std::invalid_argument("empty");
        double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument("trailing");
        vals.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (lineno == 1 && rows.empty() && ds.header.empty()) {
        for (auto& f : fields) ds.header.push_back(trim(f));
        continue;
      }
      throw std::runtime_error("csv row " + std::to_string(lineno) + ": non-numeric field");
    }
    if (ncols == 0) {
      ncols = vals.size();
    } else if (vals.size() != ncols) {
      throw std::runtime_error("csv row " + std::to_string(lineno) + ": expected " +
                               std::to_string(ncols) + " fields, got " +
                               std::to_string(vals.size()));
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error("csv: no data rows");
  ds.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < ncols; ++j) ds.x(i, j) = rows[i][j];
  }
  return ds;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open data file: " + path);
  return read_csv(is);
}

void write_csv(std::ostream& os, const Eigen::MatrixXd& x,
               const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) os << ',';
      os << header[j];
    }
    os << "\n";
  }
  char buf[40];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) os << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", x(i, j));
      os << buf;
    }
    os << "\n";
  }
}

std::uint64_t data_fingerprint(const Eigen::MatrixXd& x) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const char* p, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(p[i]);
      h *= 1099511628211ull;
    }
  };
  char buf[48];
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      int len = std::snprintf(buf, sizeof(buf), "%.17g,", x(i, j));
      mix(buf, static_cast<std::size_t>(len));
    }
    mix("\n", 1);
  }
  return h;
}

}  // namespace byucop
