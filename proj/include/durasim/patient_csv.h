#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "durasim/fitting.h"

namespace durasim {

inline constexpr const char* kPatientCsvHeader =
    "enroll_time,followup_time,event,arm,subgroup";
inline constexpr const char* kReassessCsvHeader =
    "d,actual_months,calculated_months,flag";

// Parses `enroll_time,followup_time,event,arm,subgroup` rows (event is 1 or
// 0). Malformed rows raise ParameterError naming the line.
std::vector<PatientRecord> read_patient_csv(std::istream& in);
std::vector<PatientRecord> read_patient_csv(const std::string& path);

void write_patient_csv(std::ostream& out,
                       std::span<const PatientRecord> records);

// Unobserved or unreachable values are written as empty fields.
void write_reassess_csv(std::ostream& out, std::span<const ReassessRow> rows);

}  // namespace durasim
