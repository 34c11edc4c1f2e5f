#include <cstdio>
#include <fstream>
#include <ostream>

#include "assembly/errors.hpp"
#include "assembly/pipeline.hpp"

namespace assembly {

void emit_trace_csv(const ControllerTrace& trace, std::ostream& out) {
  if (trace.records.empty()) throw ConfigError("emit_trace_csv: trace is empty");
  out << "t,phase,px,py,pz,fx,fy,fz,tx,ty,tz\n";
  char line[512];
  for (const auto& r : trace.records) {
    std::snprintf(line, sizeof line, "%.4f,%s,%.6f,%.6f,%.6f,%.4f,%.4f,%.4f,%.5f,%.5f,%.5f\n", r.t,
                  to_string(r.phase), r.position.x(), r.position.y(), r.position.z(), r.force.x(), r.force.y(),
                  r.force.z(), r.torque.x(), r.torque.y(), r.torque.z());
    out << line;
  }
}

void emit_trace_csv(const ControllerTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace to '" + path + "'");
  emit_trace_csv(trace, out);
  if (!out) throw IoError("error while writing trace to '" + path + "'");
}

}  // namespace assembly
