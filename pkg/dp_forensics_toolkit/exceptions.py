"""
异常定义 / Exception Definitions

工具包中所有机制、攻击与审计错误的统一基类
Common base class for every mechanism, attack and audit error raised by the toolkit
"""


class ForensicsError(Exception):
    """工具包错误基类 / Base class for toolkit errors"""


class SaturatedSample(ForensicsError):
    """逆CDF在 u∈{0,1} 处发散 / Inverse CDF diverges at u in {0, 1}"""


class PreconditionViolation(ForensicsError):
    """采样器输入不满足前置条件 / Sampler input violates its precondition"""


class NonFiniteInput(ForensicsError):
    """输入向量包含 NaN 或 ∞ / Input vector contains NaN or infinity"""


class OutOfDomain(ForensicsError):
    """输入超出机制定义域 / Input outside the mechanism's domain"""


class PayloadOutOfField(ForensicsError):
    """载荷元素不在 [0, p) 内 / Payload entry not in [0, p)"""


class ShapeMismatch(ForensicsError):
    """份额或向量形状不一致 / Shares or vectors have inconsistent shapes"""


class DegenerateObservation(ForensicsError):
    """观测值 z1 = z2 = 0 / Observation with z1 = z2 = 0"""


class Unbounded(ForensicsError):
    """权衡曲线在搜索范围内无法表达 / Trade-off curve too weak for the search range"""


class DegenerateSplit(ForensicsError):
    """秘密比特全为0或全为1 / Secret bit vector is all-0 or all-1"""


class MalformedRecord(ForensicsError):
    """分析日志记录格式错误 / Malformed analytics log record"""


class ConfigError(ForensicsError):
    """
    配置解析或校验失败 / Configuration parse or validation failure

    Args:
        message (str): 错误信息 / Error message
        line (int): 出错行号（如可用）/ Offending line number, when known
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
