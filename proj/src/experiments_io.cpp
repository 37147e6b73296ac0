#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pls/errors.hpp"
#include "pls/experiments.hpp"
#include "pls/format.hpp"

namespace pls {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (out.empty()) out.push_back("");
  return out;
}

class ConfigReader {
public:
  ConfigReader(const std::string& name) : name_(name) {}

  [[noreturn]] void fail(const std::string& key, int line, const std::string& what) const {
    throw ValidationError(name_ + ":" + std::to_string(line) + ": key '" + key + "' " + what);
  }

  double number(const std::string& key, int line, const std::string& value) const {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) fail(key, line, "expects a number, got '" + value + "'");
    return v;
  }

  long long integer(const std::string& key, int line, const std::string& value) const {
    const double v = number(key, line, value);
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v) fail(key, line, "expects an integer, got '" + value + "'");
    return i;
  }

  std::uint64_t unsigned_integer(const std::string& key, int line, const std::string& value) const {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE) fail(key, line, "expects an unsigned integer, got '" + value + "'");
    return v;
  }

private:
  std::string name_;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
  ExperimentConfig config;
  ConfigReader reader(name);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool spectrum_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(name + ":" + std::to_string(lineno) + ": expected 'key = value', got '" +
                            stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) reader.fail("<empty>", lineno, "is missing a name");

    if (key == "n") {
      config.n = static_cast<int>(reader.integer(key, lineno, value));
    } else if (key == "p") {
      config.p = static_cast<int>(reader.integer(key, lineno, value));
    } else if (key == "spectrum") {
      spectrum_seen = true;
      if (value == "explicit") config.spectrum.kind = SpectrumSpec::Kind::Explicit;
      else if (value == "clusters") config.spectrum.kind = SpectrumSpec::Kind::Clusters;
      else if (value == "gap") config.spectrum.kind = SpectrumSpec::Kind::Gap;
      else reader.fail(key, lineno, "must be explicit, clusters or gap");
    } else if (key == "eigenvalues") {
      const auto parts = split(value, ',');
      config.spectrum.values.resize(static_cast<Eigen::Index>(parts.size()));
      for (std::size_t t = 0; t < parts.size(); ++t) {
        config.spectrum.values(static_cast<Eigen::Index>(t)) = reader.number(key, lineno, parts[t]);
      }
    } else if (key == "centers") {
      const auto parts = split(value, ',');
      config.spectrum.centers.resize(static_cast<Eigen::Index>(parts.size()));
      for (std::size_t t = 0; t < parts.size(); ++t) {
        config.spectrum.centers(static_cast<Eigen::Index>(t)) = reader.number(key, lineno, parts[t]);
      }
    } else if (key == "spread") {
      config.spectrum.spread = reader.number(key, lineno, value);
    } else if (key == "counts") {
      config.spectrum.counts.clear();
      for (const auto& part : split(value, ',')) {
        config.spectrum.counts.push_back(static_cast<int>(reader.integer(key, lineno, part)));
      }
    } else if (key == "gap_count") {
      config.spectrum.gap_count = static_cast<int>(reader.integer(key, lineno, value));
    } else if (key == "rest_count") {
      config.spectrum.rest_count = static_cast<int>(reader.integer(key, lineno, value));
    } else if (key == "gap_low") {
      config.spectrum.gap_low = reader.number(key, lineno, value);
    } else if (key == "gap_high") {
      config.spectrum.gap_high = reader.number(key, lineno, value);
    } else if (key == "rest_low") {
      config.spectrum.rest_low = reader.number(key, lineno, value);
    } else if (key == "rest_high") {
      config.spectrum.rest_high = reader.number(key, lineno, value);
    } else if (key == "beta") {
      if (value == "equal") {
        config.beta.kind = BetaSpec::Kind::EqualWeight;
      } else if (value == "random") {
        config.beta.kind = BetaSpec::Kind::RandomUnit;
      } else if (value.rfind("aligned:", 0) == 0) {
        config.beta.kind = BetaSpec::Kind::Aligned;
        config.beta.align_power = reader.number(key, lineno, value.substr(8));
      } else if (value.rfind("fixed:", 0) == 0) {
        config.beta.kind = BetaSpec::Kind::Fixed;
        const auto parts = split(value.substr(6), ',');
        config.beta.fixed.resize(static_cast<Eigen::Index>(parts.size()));
        for (std::size_t t = 0; t < parts.size(); ++t) {
          config.beta.fixed(static_cast<Eigen::Index>(t)) = reader.number(key, lineno, parts[t]);
        }
      } else {
        reader.fail(key, lineno, "must be equal, random, aligned:<power> or fixed:<list>");
      }
    } else if (key == "noise_levels") {
      config.noise_levels.clear();
      for (const auto& part : split(value, ',')) {
        config.noise_levels.push_back(reader.number(key, lineno, part));
      }
    } else if (key == "reps") {
      config.reps = static_cast<int>(reader.integer(key, lineno, value));
    } else if (key == "k_range") {
      config.k_range.clear();
      for (const auto& part : split(value, ',')) {
        config.k_range.push_back(static_cast<int>(reader.integer(key, lineno, part)));
      }
    } else if (key == "seed") {
      config.seed = reader.unsigned_integer(key, lineno, value);
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else {
      reader.fail(key, lineno, "is not a recognized configuration key");
    }
  }

  if (config.n < 2) throw ValidationError(name + ": key 'n' must be >= 2");
  if (config.p < 1) throw ValidationError(name + ": key 'p' must be >= 1");
  if (config.reps < 1) throw ValidationError(name + ": key 'reps' must be >= 1");
  if (config.k_range.empty()) throw ValidationError(name + ": key 'k_range' must not be empty");
  for (int k : config.k_range) {
    if (k < 1) throw ValidationError(name + ": key 'k_range' entries must be >= 1");
  }
  for (double s : config.noise_levels) {
    if (s < 0) throw ValidationError(name + ": key 'noise_levels' entries must be >= 0");
  }
  if (!spectrum_seen && config.spectrum.values.size() == 0) {
    throw ValidationError(name + ": key 'spectrum' (or 'eigenvalues') is required");
  }
  if (config.spectrum.kind == SpectrumSpec::Kind::Gap && config.spectrum.rest_count == 0) {
    config.spectrum.rest_count = std::min(config.n, config.p) - config.spectrum.gap_count;
  }
  if (config.spectrum.size() < 1) {
    throw ValidationError(name + ": spectrum resolves to zero eigenvalues");
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string config_to_text(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "n = " << config.n << "\n";
  out << "p = " << config.p << "\n";
  switch (config.spectrum.kind) {
    case SpectrumSpec::Kind::Explicit: {
      out << "spectrum = explicit\neigenvalues = ";
      for (Eigen::Index t = 0; t < config.spectrum.values.size(); ++t) {
        if (t) out << ",";
        out << format_double(config.spectrum.values(t));
      }
      out << "\n";
      break;
    }
    case SpectrumSpec::Kind::Clusters: {
      out << "spectrum = clusters\ncenters = ";
      for (Eigen::Index t = 0; t < config.spectrum.centers.size(); ++t) {
        if (t) out << ",";
        out << format_double(config.spectrum.centers(t));
      }
      out << "\nspread = " << format_double(config.spectrum.spread) << "\ncounts = ";
      for (std::size_t t = 0; t < config.spectrum.counts.size(); ++t) {
        if (t) out << ",";
        out << config.spectrum.counts[t];
      }
      out << "\n";
      break;
    }
    case SpectrumSpec::Kind::Gap: {
      out << "spectrum = gap\ngap_count = " << config.spectrum.gap_count
          << "\nrest_count = " << config.spectrum.rest_count
          << "\ngap_low = " << format_double(config.spectrum.gap_low)
          << "\ngap_high = " << format_double(config.spectrum.gap_high)
          << "\nrest_low = " << format_double(config.spectrum.rest_low)
          << "\nrest_high = " << format_double(config.spectrum.rest_high) << "\n";
      break;
    }
  }
  switch (config.beta.kind) {
    case BetaSpec::Kind::EqualWeight:
      out << "beta = equal\n";
      break;
    case BetaSpec::Kind::RandomUnit:
      out << "beta = random\n";
      break;
    case BetaSpec::Kind::Aligned:
      out << "beta = aligned:" << format_double(config.beta.align_power) << "\n";
      break;
    case BetaSpec::Kind::Fixed: {
      out << "beta = fixed:";
      for (Eigen::Index t = 0; t < config.beta.fixed.size(); ++t) {
        if (t) out << ",";
        out << format_double(config.beta.fixed(t));
      }
      out << "\n";
      break;
    }
  }
  out << "noise_levels = ";
  for (std::size_t t = 0; t < config.noise_levels.size(); ++t) {
    if (t) out << ",";
    out << format_double(config.noise_levels[t]);
  }
  out << "\nreps = " << config.reps << "\nk_range = ";
  for (std::size_t t = 0; t < config.k_range.size(); ++t) {
    if (t) out << ",";
    out << config.k_range[t];
  }
  out << "\nseed = " << config.seed << "\noutput_dir = " << config.output_dir << "\n";
  return out.str();
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes on every platform
  if (!out) throw ValidationError("cannot open output file: " + path.string());
  return out;
}

}  // namespace

void write_risk_csv(const RunRecord& rec, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "sigma,k,reps,mean_risk,se_risk,chem_factor,bound\n";
  for (const CellAggregate& c : rec.cells) {
    out << format_double(c.sigma) << ',' << c.k << ',' << c.reps << ',' << format_double(c.mean)
        << ',' << format_double(c.se) << ',' << format_double(c.chem_factor) << ','
        << format_double(c.bound) << '\n';
  }
}

void write_prediction_csv(const RunRecord& rec, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "sigma,k,reps,mean_pred_error,se_pred_error,mean_eq12_term1,mean_eq12_term2,"
         "max_eq12_violation,max_qstar_gap,bound\n";
  for (const CellAggregate& c : rec.cells) {
    out << format_double(c.sigma) << ',' << c.k << ',' << c.reps << ',' << format_double(c.mean)
        << ',' << format_double(c.se) << ',' << format_double(c.mean_eq12_term1) << ','
        << format_double(c.mean_eq12_term2) << ',' << format_double(c.max_eq12_violation) << ','
        << format_double(c.max_qstar_gap) << ',' << format_double(c.bound) << '\n';
  }
}

void write_bounds_csv(const RunRecord& rec, double sigma, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "k,chem_factor,bound,observed_mean,observed_se\n";
  for (const CellAggregate& c : rec.cells) {
    if (c.sigma != sigma) continue;
    out << c.k << ',' << format_double(c.chem_factor) << ',' << format_double(c.bound) << ','
        << format_double(c.mean) << ',' << format_double(c.se) << '\n';
  }
}

void write_respath_csv(const ResidualPathTable& table, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "k,q_at_zero";
  for (int d : table.direction_indices) out << ",q_lambda_" << (d + 1);
  out << ",crosscheck_max_diff\n";
  for (Eigen::Index k = 0; k < table.values.rows(); ++k) {
    out << (k + 1) << ',' << format_double(table.value_at_zero(k));
    for (Eigen::Index d = 0; d < table.values.cols(); ++d) {
      out << ',' << format_double(table.values(k, d));
    }
    out << ',' << format_double(table.crosscheck_max_diff(k)) << '\n';
  }
}

void write_plot_script(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto out = open_for_write(dir / "plot.py");
  out << R"PY(#!/usr/bin/env python3
"""Plots the CSV files written next to this script."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read_csv(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path) as f:
        return list(csv.DictReader(f))


def group_by_sigma(rows):
    out = {}
    for row in rows:
        out.setdefault(row["sigma"], []).append(row)
    return out


def plot_study(name, value_col, ylabel, fname):
    rows = read_csv(name)
    if not rows:
        return
    plt.figure(figsize=(7, 4.5))
    for sigma, group in sorted(group_by_sigma(rows).items(), key=lambda kv: float(kv[0])):
        ks = [int(r["k"]) for r in group]
        vals = [float(r[value_col]) for r in group]
        plt.semilogy(ks, vals, marker="o", label=f"sigma={sigma}")
        if "bound" in group[0]:
            bounds = [float(r["bound"]) for r in group]
            plt.semilogy(ks, bounds, linestyle="--", alpha=0.6)
    plt.xlabel("k")
    plt.ylabel(ylabel)
    plt.legend()
    plt.tight_layout()
    plt.savefig(os.path.join(HERE, fname), dpi=150)
    plt.close()


def plot_respath():
    rows = read_csv("respath.csv")
    if not rows:
        return
    cols = [c for c in rows[0] if c.startswith("q_lambda_")]
    plt.figure(figsize=(7, 4.5))
    ks = [int(r["k"]) for r in rows]
    for c in cols:
        plt.plot(ks, [float(r[c]) for r in rows], marker="o", label=c)
    plt.axhline(0.0, color="k", linewidth=0.5)
    plt.xlabel("k")
    plt.ylabel("residual polynomial value")
    plt.legend()
    plt.tight_layout()
    plt.savefig(os.path.join(HERE, "respath.png"), dpi=150)
    plt.close()


def main():
    plot_study("risk.csv", "mean_risk", "empirical risk", "risk.png")
    plot_study("prediction.csv", "mean_pred_error", "prediction error", "prediction.png")
    plot_respath()
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";
}

}  // namespace pls
