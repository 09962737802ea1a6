#include "qmf/numfmt.hpp"

#include <cmath>
#include <cstdio>

namespace qmf {

std::string fmt12(double v) {
    if (v == 0.0)
        return "0"; // folds -0 into 0
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt12(Complex v) {
    const std::string re = fmt12(v.real());
    if (v.imag() == 0.0)
        return re;
    const std::string im = fmt12(std::abs(v.imag()));
    return re + (v.imag() < 0.0 ? " - " : " + ") + im + "i";
}

} // namespace qmf
