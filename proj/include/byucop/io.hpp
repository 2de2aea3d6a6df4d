#ifndef BYUCOP_IO_HPP_
#define BYUCOP_IO_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace byucop {

// Flat key=value configuration. '#' starts a comment; keys are dotted
// (section.name); unknown keys are rejected at parse time so typos fail
// loudly. Parsing preserves order, so parse -> echo -> parse is idempotent.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;      // comma-separated
  std::vector<std::string> get_words(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void echo(std::ostream& os) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct Dataset {
  Eigen::MatrixXd x;                 // n x d, no missing values
  std::vector<std::string> header;   // empty when the file had none
};

// Comma-delimited, decimal point, optional single header row. Malformed rows
// raise with the 1-based row number.
Dataset read_csv(std::istream& is);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& os, const Eigen::MatrixXd& x,
               const std::vector<std::string>& header = {});

// FNV-1a over the textual form of the data; used to refuse comparing fits
// that were run on different datasets.
std::uint64_t data_fingerprint(const Eigen::MatrixXd& x);

}  // namespace byucop

#endif  // BYUCOP_IO_HPP_
