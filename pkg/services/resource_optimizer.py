import gc
import os
import threading
from typing import Dict

import psutil

from config import Config
from services.console import status


class ResourceOptimizer:
    """资源优化器：监控内存，压力过大时清空已登记的备忘缓存"""

    def __init__(self):
        self.thresholds = dict(Config.RESOURCE_THRESHOLDS)
        self.memo_limit = Config.MEMO_LIMIT
        self._caches: Dict[str, dict] = {}
        self._lock = threading.Lock()
        self.cleanups = 0

    def register_cache(self, name: str, cache: dict):
        """登记一个可随时清空的缓存"""
        with self._lock:
            self._caches[name] = cache

    def cache_sizes(self) -> Dict[str, int]:
        with self._lock:
            return {name: len(cache) for name, cache in sorted(self._caches.items())}

    def check(self):
        """检查内存与缓存规模，必要时清理"""
        oversized = [name for name, size in self.cache_sizes().items() if size > self.memo_limit]
        if oversized:
            status(f"⚠️ 缓存超过上限 {self.memo_limit}: {', '.join(oversized)}")
            self.clear_caches(oversized)
        try:
            memory = psutil.virtual_memory()
            rss_mb = psutil.Process(os.getpid()).memory_info().rss / (1024 ** 2)
        except Exception as e:
            status(f"⚠️ 资源检查异常: {e}")
            return
        if memory.percent > self.thresholds['memory_percent_warning'] or rss_mb > self.thresholds['rss_mb_warning']:
            self._optimize_memory(memory.percent, rss_mb)

    def _optimize_memory(self, memory_percent: float, rss_mb: float):
        status(f"⚠️ 内存使用率过高: {memory_percent:.1f}%，进程占用 {rss_mb:.0f} MB")
        self.clear_caches()
        collected = gc.collect()
        status(f"🗑️ 垃圾回收完成，回收对象数: {collected}")
        if memory_percent > self.thresholds['memory_percent_critical']:
            status("🚨 内存使用率极高，建议缩小窗口或元数上限")

    def clear_caches(self, names=None):
        with self._lock:
            targets = list(self._caches) if names is None else list(names)
            for name in targets:
                cache = self._caches.get(name)
                if cache is not None:
                    cache.clear()
        self.cleanups += 1
        status(f"🗑️ 已清空缓存: {', '.join(targets)}")

    def get_system_status(self) -> Dict:
        """获取系统状态"""
        try:
            memory = psutil.virtual_memory()
            cpu_percent = psutil.cpu_percent(interval=0.1)
            rss_mb = psutil.Process(os.getpid()).memory_info().rss / (1024 ** 2)
            return {
                "cpu_percent": cpu_percent,
                "memory_percent": memory.percent,
                "memory_available_gb": memory.available / (1024 ** 3),
                "memory_total_gb": memory.total / (1024 ** 3),
                "rss_mb": rss_mb,
                "caches": self.cache_sizes(),
                "cleanups": self.cleanups,
                "status": "normal" if memory.percent < self.thresholds['memory_percent_warning'] else "warning",
            }
        except Exception as e:
            return {"error": str(e), "caches": self.cache_sizes()}


# 全局资源优化器实例
resource_optimizer = ResourceOptimizer()
