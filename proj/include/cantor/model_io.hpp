#ifndef CANTOR_MODEL_IO_HPP
#define CANTOR_MODEL_IO_HPP

#include <string>

#include "cantor/measure.hpp"

namespace cantor {

// Measure specification files are JSON documents with a "type" field in
// {"bernoulli","markov","hidden_markov","mixture"} and the numeric fields of
// that family. Probabilities may be JSON numbers or decimal strings; both
// parse to double precision. A missing start distribution is computed from
// the transition matrix.
//
// strict (the default) enforces stationarity of an explicit start
// distribution; the invariance checker loads leniently so that broken
// starts can be diagnosed instead of rejected.
MeasureModel parse_model_json(const std::string& text, bool strict = true);
MeasureModel load_model_file(const std::string& path, bool strict = true);

// The file form of a model, normalized; round-trips through parse_model_json.
std::string model_to_json(const MeasureModel& m);

}  // namespace cantor

#endif
