"""异常类型"""


class EWError(Exception):
    """所有计算错误的基类"""


class InputError(EWError):
    """输入错误：解析失败、变量集不匹配、浮点字面量、度数错误等"""

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WindowError(EWError):
    """窗口太小或在微分的次数平移下不封闭"""


class VerificationFailure(EWError):
    """校验失败，携带第一个反例"""

    def __init__(self, message: str, counterexample=None):
        self.counterexample = counterexample
        super().__init__(message)
