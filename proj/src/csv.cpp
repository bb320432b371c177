#include "mimosim/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "mimosim/errors.hpp"

namespace mimosim {

namespace {

std::string field(const SweepRecord& r, const std::string& column) {
  if (column == "noise_power") return format_double(r.noise_power);
  if (column == "snr_tx_db") return format_double(r.snr_tx_db);
  if (column == "ebn0_tx_db") return format_double(r.ebn0_tx_db);
  if (column == "channel_mse") return format_double(r.channel_mse);
  if (column == "bler") return format_double(r.bler);
  if (column == "ser") return format_double(r.ser);
  if (column == "ber") return format_double(r.ber);
  if (column == "classification_error") return format_double(r.classification_error);
  if (column == "detector") return r.detector;
  if (column == "estimator") return r.estimator;
  if (column == "seed") return std::to_string(r.seed);
  throw InvalidParameter("extract: unknown column '" + column + "'");
}

std::string join_rows(std::span<const SweepRecord> records,
                      std::span<const std::string> columns) {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const SweepRecord& r : records) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += field(r, columns[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

} // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "noise_power", "snr_tx_db", "ebn0_tx_db", "channel_mse", "bler", "ser",
      "ber", "classification_error", "detector", "estimator", "seed"};
  return cols;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_csv(std::span<const SweepRecord> records) {
  return join_rows(records, csv_columns());
}

void write_csv(std::span<const SweepRecord> records, const std::filesystem::path& path) {
  if (records.empty()) throw UndefinedMeasure("write_csv: no records");
  write_text(format_csv(records), path);
}

std::string format_extract(std::span<const SweepRecord> records,
                           std::span<const std::string> columns) {
  for (const auto& c : columns) {
    if (std::find(csv_columns().begin(), csv_columns().end(), c) == csv_columns().end()) {
      throw InvalidParameter("extract: unknown column '" + c + "'");
    }
  }
  return join_rows(records, columns);
}

void write_extract(std::span<const SweepRecord> records,
                   std::span<const std::string> columns,
                   const std::filesystem::path& path) {
  write_text(format_extract(records, columns), path);
}

std::filesystem::path extract_path_for(const std::filesystem::path& output) {
  std::filesystem::path p = output;
  p.replace_filename(output.stem().string() + "_extract" + output.extension().string());
  return p;
}

} // namespace mimosim
