#include "gsa/classifier.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gsa/error.hpp"
#include "gsa/file_util.hpp"
#include "gsa/rng.hpp"

namespace gsa {
namespace {

constexpr const char* kModelFormat = "gsa-linear-model-1";

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << format_double(row[i]);
  }
  out << '\n';
}

std::vector<double> parse_row(const std::string& line, std::size_t expected) {
  std::vector<double> row;
  std::istringstream in(line);
  std::string cell;
  try {
    while (std::getline(in, cell, ',')) row.push_back(std::stod(cell));
  } catch (const std::logic_error&) {
    throw InputError("malformed number in model file");
  }
  if (row.size() != expected) throw InputError("model row has the wrong length");
  return row;
}

}  // namespace

double LinearModel::score(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw InputError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(weights.size()));
  }
  double sum = bias;
  for (std::size_t i = 0; i < x.size(); ++i) sum += weights[i] * ((x[i] - mean[i]) / scale[i]);
  return sum;
}

LinearModel train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                  const TrainConfig& config) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InputError("training needs at least 2 labeled examples");
  const std::size_t dim = x.front().size();
  bool seen_neg = false;
  bool seen_pos = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].size() != dim) throw InputError("training rows have different lengths");
    if (y[i] == -1) {
      seen_neg = true;
    } else if (y[i] == 1) {
      seen_pos = true;
    } else {
      throw InputError("labels must be -1 or +1");
    }
  }
  if (!seen_neg || !seen_pos) throw InputError("training set contains a single class");
  if (config.epochs < 1) throw InputError("epochs must be at least 1");

  LinearModel model;
  model.config = config;
  model.config.lambda = config.lambda > 0.0 ? config.lambda : 1.0 / static_cast<double>(n);
  model.mean.assign(dim, 0.0);
  model.scale.assign(dim, 1.0);
  if (config.standardize) {
    for (const auto& row : x) {
      for (std::size_t c = 0; c < dim; ++c) model.mean[c] += row[c];
    }
    for (double& mu : model.mean) mu /= static_cast<double>(n);
    std::vector<double> var(dim, 0.0);
    for (const auto& row : x) {
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = row[c] - model.mean[c];
        var[c] += d * d;
      }
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const double sd = std::sqrt(var[c] / static_cast<double>(n));
      model.scale[c] = sd > 0.0 ? sd : 1.0;
    }
  }

  std::vector<std::vector<double>> z(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dim; ++c) z[i][c] = (x[i][c] - model.mean[c]) / model.scale[c];
  }

  const double lambda = model.config.lambda;
  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream rng(config.seed, stream_id(StreamTag::kClassifier, 0));
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      double margin = b;
      for (std::size_t c = 0; c < dim; ++c) margin += w[c] * z[i][c];
      margin *= y[i];
      const double shrink = 1.0 - eta * lambda;
      for (double& wc : w) wc *= shrink;
      b *= shrink;
      if (margin < 1.0) {
        const double step = eta * y[i];
        for (std::size_t c = 0; c < dim; ++c) w[c] += step * z[i][c];
        b += step;
      }
    }
  }
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

int predict(const LinearModel& model, std::span<const double> x) {
  return model.score(x) > 0.0 ? model.classes[1] : model.classes[0];
}

double evaluate(const LinearModel& model, const std::vector<std::vector<double>>& x,
                const std::vector<int>& y) {
  if (x.empty() || x.size() != y.size()) throw InputError("test set is empty or mislabeled");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) correct += predict(model, x[i]) == y[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(x.size());
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "format=" << kModelFormat << '\n';
    out << "lambda=" << format_double(model.config.lambda) << '\n';
    out << "epochs=" << model.config.epochs << '\n';
    out << "seed=" << model.config.seed << '\n';
    out << "standardize=" << (model.config.standardize ? 1 : 0) << '\n';
    out << "classes=" << model.classes[0] << ',' << model.classes[1] << '\n';
    out << "dim=" << model.dim() << '\n';
    out << "---\n";
    write_row(out, model.mean);
    write_row(out, model.scale);
    write_row(out, model.weights);
    out << format_double(model.bias) << '\n';
  });
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path.string());
  std::map<std::string, std::string> header;
  std::string line;
  while (std::getline(in, line) && line != "---") {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("malformed model header line: " + line);
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (header["format"] != kModelFormat) throw InputError("unsupported model format");
  LinearModel model;
  try {
    model.config.lambda = std::stod(header.at("lambda"));
    model.config.epochs = std::stoi(header.at("epochs"));
    model.config.seed = std::stoull(header.at("seed"));
    model.config.standardize = header.at("standardize") == "1";
    const std::string classes = header.at("classes");
    const auto comma = classes.find(',');
    model.classes[0] = std::stoi(classes.substr(0, comma));
    model.classes[1] = std::stoi(classes.substr(comma + 1));
    const std::size_t dim = std::stoull(header.at("dim"));
    std::string row;
    auto next_row = [&] {
      if (!std::getline(in, row)) throw InputError("model file is truncated");
      return row;
    };
    model.mean = parse_row(next_row(), dim);
    model.scale = parse_row(next_row(), dim);
    model.weights = parse_row(next_row(), dim);
    model.bias = parse_row(next_row(), 1).front();
  } catch (const std::out_of_range&) {
    throw InputError("model header is missing a key");
  } catch (const std::invalid_argument&) {
    throw InputError("malformed model header value");
  }
  return model;
}

}  // namespace gsa
