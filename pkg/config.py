import os
from pathlib import Path

class Config:
    # 项目路径
    BASE_DIR = Path(__file__).parent
    DATA_DIR = BASE_DIR / "data"
    FANS_DIR = DATA_DIR / "fans"
    POTENTIALS_DIR = DATA_DIR / "potentials"
    MODULES_DIR = DATA_DIR / "modules"

    # 输出目录
    OUTPUT_DIR = Path(os.getenv("EW_OUTPUT_DIR", str(BASE_DIR / "outputs")))
    REPORTS_DIR = OUTPUT_DIR / "reports"

    # 创建所有必要的目录
    @classmethod
    def create_directories(cls):
        for dir_path in [cls.OUTPUT_DIR, cls.REPORTS_DIR]:
            dir_path.mkdir(parents=True, exist_ok=True)

    # 状态输出（stderr，默认关闭）
    VERBOSE = os.getenv("EW_VERBOSE", "0") == "1"

    # 并行任务数
    JOBS = int(os.getenv("EW_JOBS", "1"))

    # 窗口参数
    DEFAULT_DEPTH = 4            # 权重次数上限
    DEFAULT_HOM_RANGE = (0, 4)   # 同调次数范围（闭区间）
    DEFAULT_ARITY = 4            # Stasheff 检查的总元数上限
    SEMIGROUP_BOUND = 8          # 半群成员搜索的生成元个数上限
    REGULARITY_DEPTH = 4         # 正则序列检查的窗口深度
    RANDOM_SAMPLES = 20          # 随机参数个数
    RANDOM_SEED = 20240607

    # 扇的射线个数上限（Γ 枚举为指数级）
    GAMMA_RAY_CAP = 20

    # 缓存与资源阈值
    MEMO_LIMIT = int(os.getenv("EW_MEMO_LIMIT", "200000"))
    RESOURCE_THRESHOLDS = {
        'memory_percent_warning': 85,   # 内存使用率警告阈值
        'memory_percent_critical': 95,  # 内存使用率危险阈值
        'rss_mb_warning': 4096,         # 进程常驻内存警告阈值（MB）
    }

    # 输入文件扩展名
    SUPPORTED_INPUT_FORMATS = {
        'fan': ['.fan'],
        'potential': ['.pot'],
        'module': ['.mod'],
    }

    # CLI 退出码
    EXIT_CODES = {
        'ok': 0,
        'verification_failure': 1,
        'input_error': 2,
    }
