from .gaussian import (Level, as_level, std_normal_pdf, std_normal_cdf, std_normal_quantile, critical_value,
                       two_sided_p_value)
