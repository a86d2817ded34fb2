#pragma once

// Field snapshot file: a 4-byte little-endian header length, a JSON header
// {"magic","n","d","name","time","components"}, then components * n^d
// float64 values in little-endian x-major order. See README for the layout.

#include <string>

#include "ins/field.hpp"

namespace ins {

struct Snapshot {
    std::string name;
    double time = 0.0;
    int components = 1;
    Grid grid;
    std::vector<std::vector<double>> data;  // one vector per component
};

void write_snapshot(const std::string& path, const ScalarField& f,
                    const std::string& name, double time);
void write_snapshot(const std::string& path, const VectorField& v,
                    const std::string& name, double time);
Snapshot read_snapshot(const std::string& path);

ScalarField snapshot_scalar(const Snapshot& s, int component = 0);
VectorField snapshot_vector(const Snapshot& s);

}  // namespace ins
