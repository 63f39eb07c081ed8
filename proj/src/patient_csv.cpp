#include "durasim/patient_csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "durasim/errors.h"

namespace durasim {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_time(const std::string& text, std::size_t line, const char* what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value) || value < 0.0) {
    throw ParameterError("line " + std::to_string(line) + ": " + what +
                         " must be a nonnegative number, got '" + text + "'");
  }
  return value;
}

void write_months(std::ostream& out, double months) {
  if (std::isfinite(months)) out << months;
}

}  // namespace

std::vector<PatientRecord> read_patient_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("patient CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // Tolerate a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != kPatientCsvHeader) {
    throw ParameterError(std::string("patient CSV header must be '") +
                         kPatientCsvHeader + "', got '" + line + "'");
  }
  std::vector<PatientRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParameterError("line " + std::to_string(line_no) +
                           ": expected 5 fields, got " +
                           std::to_string(fields.size()));
    }
    PatientRecord r;
    r.enroll_time = parse_time(fields[0], line_no, "enroll_time");
    r.followup_time = parse_time(fields[1], line_no, "followup_time");
    if (fields[2] == "1") {
      r.event = true;
    } else if (fields[2] == "0") {
      r.event = false;
    } else {
      throw ParameterError("line " + std::to_string(line_no) +
                           ": event must be 1 or 0, got '" + fields[2] + "'");
    }
    r.arm = fields[3];
    r.subgroup = fields[4];
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PatientRecord> read_patient_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_patient_csv(in);
}

void write_patient_csv(std::ostream& out,
                       std::span<const PatientRecord> records) {
  out << std::setprecision(17) << kPatientCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.enroll_time << ',' << r.followup_time << ',' << (r.event ? 1 : 0)
        << ',' << r.arm << ',' << r.subgroup << '\n';
  }
}

void write_reassess_csv(std::ostream& out, std::span<const ReassessRow> rows) {
  out << std::setprecision(12) << kReassessCsvHeader << '\n';
  for (const auto& row : rows) {
    out << row.d << ',';
    write_months(out, row.actual_months);
    out << ',';
    write_months(out, row.calculated_months);
    out << ',' << row.flag() << '\n';
  }
}

}  // namespace durasim
