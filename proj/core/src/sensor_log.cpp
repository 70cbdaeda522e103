#include "magnav/sensor_log.hpp"

#include <cstdio>
#include <ostream>

namespace magnav {
namespace {

void put(std::ostream& os, const char* fmt, auto... vals) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, vals...);
  os << buf;
}

}  // namespace

void write_imu_csv(std::ostream& os, const SensorLog& log) {
  os << "t,fx,fy,fz,wx,wy,wz\n";
  for (size_t k = 0; k < log.size(); ++k)
    put(os, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", log.t[k],
        log.f[k].x(), log.f[k].y(), log.f[k].z(), log.omega[k].x(),
        log.omega[k].y(), log.omega[k].z());
}

void write_mag_csv(std::ostream& os, const SensorLog& log) {
  os << "t,sensor_index,bx,by,bz\n";
  for (size_t k = 0; k < log.size(); ++k)
    for (int i = 0; i < log.mag[k].cols(); ++i)
      put(os, "%.17g,%d,%.17g,%.17g,%.17g\n", log.t[k], i,
          log.mag[k](0, i), log.mag[k](1, i), log.mag[k](2, i));
}

void write_truth_csv(std::ostream& os, const SensorLog& log) {
  os << "t,rx,ry,rz,qw,qx,qy,qz,vx,vy,vz\n";
  for (size_t k = 0; k < log.size(); ++k) {
    const NavState& s = log.truth[k];
    put(os, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
        log.t[k], s.r.x(), s.r.y(), s.r.z(), s.q.w(), s.q.x(), s.q.y(),
        s.q.z(), s.v.x(), s.v.y(), s.v.z());
  }
}

}  // namespace magnav
