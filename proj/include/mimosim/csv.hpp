#ifndef MIMOSIM_CSV_HPP
#define MIMOSIM_CSV_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mimosim/simulation.hpp"

namespace mimosim {

/// Column order of output.csv.
inline constexpr const char* kCsvHeader =
    "noise_power,snr_tx_db,ebn0_tx_db,channel_mse,bler,ser,ber,"
    "classification_error,detector,estimator,seed";

const std::vector<std::string>& csv_columns();

/// Shortest-exact text with 17 significant digits.
std::string format_double(double v);

/// Header plus one LF-terminated line per record.
std::string format_csv(std::span<const SweepRecord> records);

/// Throws UndefinedMeasure on an empty record list and IoError when the
/// path cannot be written.
void write_csv(std::span<const SweepRecord> records,
               const std::filesystem::path& path);

/// Selected columns only, same formatting. Throws InvalidParameter for an
/// unknown column name.
std::string format_extract(std::span<const SweepRecord> records,
                           std::span<const std::string> columns);

void write_extract(std::span<const SweepRecord> records,
                   std::span<const std::string> columns,
                   const std::filesystem::path& path);

/// "out.csv" -> "out_extract.csv".
std::filesystem::path extract_path_for(const std::filesystem::path& output);

} // namespace mimosim

#endif // MIMOSIM_CSV_HPP
