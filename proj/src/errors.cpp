#include "compsupp/errors.hpp"
