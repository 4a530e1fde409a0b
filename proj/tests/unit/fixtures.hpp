#pragma once

#include <vector>

namespace fixture {

inline const std::vector<double> leukemia = {23, 7.5, 43, 26, 60, 105, 100, 170,
                                             54, 70, 94, 320, 350, 1000, 520, 1000};
inline const std::vector<double> telephone = {-988, -135, -78, 3, 59, 83, 93,
                                              110, 189, 197, 204, 229, 289, 310};
inline const std::vector<double> darwin = {-67, -48, 6, 8, 14, 16, 23, 24, 28, 29, 41, 49, 56, 60, 75};

}  // namespace fixture
