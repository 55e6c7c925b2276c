#include "quatnn/quaternion.hpp"

#include <ostream>

namespace quatnn {

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << "(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
}

}  // namespace quatnn
