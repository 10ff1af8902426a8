#pragma once

#include <json.hpp>
#include <string>

#include "ggibbs/entropy.hpp"
#include "ggibbs/lattice.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/potential.hpp"

namespace ggibbs {

// ordered_json keeps key order stable so equal inputs give byte-equal files
using Json = nlohmann::ordered_json;

Json to_json(const Window& w);
Window window_from_json(const Json& j);

Json to_json(const SpinAlphabet& a);
SpinAlphabet alphabet_from_json(const Json& j);

Json to_json(const Exterior& e, int dim);
Exterior exterior_from_json(const Json& j);

// {dimension, lo, hi, alphabet, values (row-major), exterior}
Json to_json(const Configuration& c);
Configuration configuration_from_json(const Json& j);

// {kind, q, dimension, range, terms:[{sites, table}], anchored:[...]}
Json to_json(const Potential& p);
Potential potential_from_json(const Json& j);

Json to_json(const ExactMeasure& m);

Json to_json(const EntropyEstimate& e);

// JSON-lines: a header record with sampler metadata, then one record per
// sample
void write_sample_set(const SampleSet& s, const std::string& path);
SampleSet read_sample_set(const std::string& path);

void write_json_file(const Json& j, const std::string& path);

}  // namespace ggibbs
