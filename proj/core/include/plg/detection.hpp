#pragma once

#include "plg/image.hpp"

namespace plg {

struct Detection {
    int frame_index = 0;
    BBox bbox;
    double confidence = 1.0;
    int class_id = 0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

}  // namespace plg
