#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "twinbeam/model.hpp"
#include "twinbeam/moments.hpp"
#include "twinbeam/photodist.hpp"
#include "twinbeam/quasidist.hpp"

namespace twinbeam::io {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double v);

/// Pretty JSON with every floating-point number printed to 17 significant
/// digits. Non-finite numbers are written as null.
std::string dump_json(const Json& value, int indent = 2);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Per-shot CSV with header `shot,m1,m2`. Blank lines are skipped; anything
/// else that is not three integers throws ParseError naming the line.
RawCountData read_shots_csv(std::istream& in, double eta);
RawCountData read_shots_csv_file(const std::string& path, double eta);
void write_shots_csv(std::ostream& out, const RawCountData& data);

struct MomentInput {
  MomentSet moments;
  std::optional<double> eta;
  std::optional<MomentSet> noise;
};

/// Moment JSON: level, mean1, mean2, second1, second2, cross, optional eta,
/// optional noise object of the same shape.
MomentInput parse_moment_json(const std::string& text);
Json moments_to_json(const MomentSet& m);

Json model_to_json(const TwinBeamModel& m);
TwinBeamModel model_from_json(const std::string& text);

Json report_to_json(const TwinBeamModel& m, const NonclassicalityReport& r);
std::string report_text(const TwinBeamModel& m, const NonclassicalityReport& r);

/// n1,n2,p for every stored entry with |p| >= threshold.
void write_joint_csv(std::ostream& out, const JointPhotonDistribution& joint,
                     double threshold = 0.0);
/// n,p
void write_difference_csv(std::ostream& out, const DifferenceDistribution& d);
/// Matrix: first row "w1\w2" then W2 values; each further row W1 then values.
void write_quasi_csv(std::ostream& out, const QuasiGrid& grid);
/// w,p
void write_difference_quasi_csv(std::ostream& out, const DifferenceQuasi& d);

}  // namespace twinbeam::io
